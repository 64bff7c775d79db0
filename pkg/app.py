import os
from dotenv import load_dotenv
load_dotenv()
import logging
from flask import Flask

# Configure logging
logging.basicConfig(level=os.environ.get("WPSS_LOG_LEVEL", "WARNING").upper())

DEFAULT_CONFIG = {
    "WPSS_TITS_BUDGET": 5_000_000,
    "WPSS_COLLECT_BUDGET": 10_000_000,
    "WPSS_POOL_BUDGET": 20_000,
    "WPSS_MAX_RELATORS": 10 ** 6,
    "WPSS_PARALLEL_TASKS": 4,
}


def _env_int(name, default):
    value = os.environ.get(name)
    if value is None or value == "":
        return default
    try:
        return int(value)
    except ValueError:
        logging.getLogger(__name__).warning(f"{name}={value!r} não é inteiro; usando {default}")
        return default


def create_app(test_config=None):
    app = Flask(__name__)

    # Configuration
    app.config.from_mapping(DEFAULT_CONFIG)
    for key in DEFAULT_CONFIG:
        app.config[key] = _env_int(key, app.config[key])
    budget = _env_int("WPSS_BUDGET", None)
    if budget is not None:
        app.config["WPSS_TITS_BUDGET"] = budget
        app.config["WPSS_COLLECT_BUDGET"] = budget
    if test_config:
        app.config.update(test_config)

    # Register blueprints
    from commands.scheme import scheme_bp

    app.register_blueprint(scheme_bp)

    return app
