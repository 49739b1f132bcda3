import logging

from flask import Flask
from config.config import Config

def create_app(config_class=Config):
    app = Flask(__name__)
    app.config.from_object(config_class)

    # stderr only: stdout carries the reports
    logging.basicConfig(level=app.config['LOG_LEVEL'])

    from app.commands.main import bp as main_bp

    app.register_blueprint(main_bp)

    return app
