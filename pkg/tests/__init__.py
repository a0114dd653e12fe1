import os

# Small default sizes for the whole suite
os.environ.setdefault('COBCALC_ENV', 'testing')
