from .Observables import *
