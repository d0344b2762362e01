__version__ = "0.1.0"

from squeezecheck.Observables import *
from squeezecheck.FreeSpace import *
from squeezecheck.CavitySolver import *
from squeezecheck.Approximation import *
from squeezecheck.Detection import *
from .ScanCheck import *
