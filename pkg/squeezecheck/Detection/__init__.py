from .Detection import *
