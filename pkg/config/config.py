import os

class Config:
    SEED = int(os.environ.get('OSCILLAB_SEED') or 0)
    CASE_COUNT = int(os.environ.get('OSCILLAB_CASES') or 1000)
    OUTPUT_FORMAT = os.environ.get('OSCILLAB_FORMAT') or 'json'
    LOG_LEVEL = os.environ.get('OSCILLAB_LOG_LEVEL') or 'WARNING'

    # upper bounds for the randomized selftest instances
    MAX_DENOMINATOR = 12
    MAX_TRANSIENT = 6
    MAX_PERIOD = 4


class TestConfig(Config):
    TESTING = True
    SEED = 0
    CASE_COUNT = 40
    LOG_LEVEL = 'DEBUG'
