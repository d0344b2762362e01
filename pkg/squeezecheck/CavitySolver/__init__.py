from .CavitySolver import *
