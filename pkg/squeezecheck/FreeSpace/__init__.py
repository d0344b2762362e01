from .FreeSpace import *
