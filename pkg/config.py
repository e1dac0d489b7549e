import os
from dotenv import load_dotenv

load_dotenv()


def _flag(name, default=None):
    value = os.environ.get(name)
    if value is None or value == '':
        return default
    return value.strip().lower() in ('1', 'true', 'yes', 'on')


def _count(name, default=None):
    value = os.environ.get(name)
    return int(value) if value else default


class Config:
    """Base configuration"""
    LOG_LEVEL = os.environ.get('HYPERMARGINAL_LOG_LEVEL', 'INFO')
    LOG_FILE = os.environ.get('HYPERMARGINAL_LOG_FILE')
    THREADS = _count('HYPERMARGINAL_THREADS', 1)
    OUTPUT_DIR = os.environ.get('HYPERMARGINAL_OUTPUT_DIR', 'results')
    # None leaves the decision to the experiment config (default: recorded)
    RECORD_WALL_TIME = _flag('HYPERMARGINAL_RECORD_WALL_TIME')


class ProductionConfig(Config):
    """Long unattended runs: all cores, quieter logs"""
    ENV = 'production'
    LOG_LEVEL = os.environ.get('HYPERMARGINAL_LOG_LEVEL', 'WARNING')
    THREADS = _count('HYPERMARGINAL_THREADS', -1)


class DevelopmentConfig(Config):
    """Development configuration"""
    ENV = 'development'
    LOG_LEVEL = os.environ.get('HYPERMARGINAL_LOG_LEVEL', 'DEBUG')


class TestingConfig(Config):
    """Testing configuration"""
    ENV = 'testing'
    LOG_FILE = None
    THREADS = 1
    RECORD_WALL_TIME = False


config = {
    'development': DevelopmentConfig,
    'production': ProductionConfig,
    'testing': TestingConfig,
    'default': Config
}


def get_config(env=None):
    """Settings class for env, falling back to HYPERMARGINAL_ENV"""
    return config.get(env or os.environ.get('HYPERMARGINAL_ENV', 'default'), Config)
