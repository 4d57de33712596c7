import os
import sys
from datetime import datetime

from loguru import logger

LOG_FORMAT = "[ {time:YYYY-MM-DD HH:mm:ss} ] {line} {extra[name]} - {level} - {message}"


class LevinsonLogger:
    def __init__(self):
        # Create logs directory
        self.LOG_FILE = f"levinson_{datetime.now().strftime('%m_%d_%Y_%H_%M_%S')}.log"
        self.logs_path = os.path.join(os.getcwd(), "logs")
        os.makedirs(self.logs_path, exist_ok=True)

        self.LOG_FILE_PATH = os.path.join(self.logs_path, self.LOG_FILE)

        logger.remove()
        logger.configure(extra={"name": "Levinson"})
        logger.add(self.LOG_FILE_PATH, format=LOG_FORMAT, level="DEBUG")

        # Console sink for development
        logger.add(sys.stderr, format=LOG_FORMAT, level="INFO")

        self.logger = logger.bind(name="Levinson")

    def get_logger(self):
        return self.logger


# Global logger instance
levinson_logger = LevinsonLogger().get_logger()


def get_logger(name=None):
    return logger.bind(name=name or "Levinson")


if __name__ == "__main__":
    levinson_logger.info("Levinson logging system initialized")
