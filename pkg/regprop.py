from app import create_app
import logging

from config.settings import Config

logging.basicConfig(level=Config.LOG_LEVEL)

app = create_app()

if __name__ == "__main__":
    raise SystemExit(app.run())
