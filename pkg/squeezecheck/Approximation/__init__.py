from .Approximation import *
