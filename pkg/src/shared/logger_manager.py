import logging
import logging.config


def configure_logging(level="INFO", log_file=None):
    """
    Configures the logging system for the application.

    Console output goes to stderr so that results written to stdout stay clean.
    A file handler is added only when log_file is given.
    """
    handlers = {
        "console": {
            "level": "DEBUG",
            "class": "logging.StreamHandler",
            "formatter": "detailed",
            "stream": "ext://sys.stderr",
        },
    }
    if log_file:
        handlers["file"] = {
            "level": "DEBUG",
            "class": "logging.FileHandler",
            "filename": log_file,
            "formatter": "detailed",
        }
    all_handlers = list(handlers)

    logging.config.dictConfig(
        {
            "version": 1,
            "disable_existing_loggers": False,
            "formatters": {
                "detailed": {
                    "format": "%(asctime)s [%(levelname)s] %(name)s: %(message)s",
                },
            },
            "handlers": handlers,
            "loggers": {
                "default": {
                    "handlers": all_handlers,
                    "level": level,
                    "propagate": False,
                },
                "debugger": {
                    "handlers": all_handlers,
                    "level": "DEBUG" if level == "DEBUG" else "WARNING",
                    "propagate": False,
                },
                "error_logger": {
                    "handlers": all_handlers,
                    "level": "ERROR",
                    "propagate": False,
                },
            },
            "root": {
                "handlers": all_handlers,
                "level": "WARNING",
            },
        }
    )


class LoggerMixin:
    """
    Mixin class to provide pre-configured loggers and reusable logging methods.
    """

    def __init__(
        self,
        logger_name="default",
        debugger_name="debugger",
        error_logger_name="error_logger",
    ):
        self.logger = logging.getLogger(logger_name)
        self.debugger = logging.getLogger(debugger_name)
        self.error_logger = logging.getLogger(error_logger_name)

    def log_info(self, message):
        """
        Log an informational event.

        Parameters:
        - message (str): The message to log.
        """
        self.logger.info(message)

    def log_error(self, message):
        """
        Log an error event.

        Parameters:
        - message (str): The message to log.
        """
        self.error_logger.error(f"Error: {message}")

    def log_stage_event(self, stage, label=None, message=""):
        """
        Log an event of one processing stage (fit, elimination, sweep...).

        Parameters:
        - stage (str): The name of the stage.
        - label (optional): Dataset or model label the event belongs to.
        - message (str): The message to log.
        """
        log_message = f"[Stage-{stage} - {label}] {message}"
        self.logger.info(log_message)

    def log_debugger(self, message):
        self.debugger.debug(message)

    def log_state_transition(self, in_name, from_state, to_state, time_s=None):
        """Log state transitions with structured logging."""
        log_message = {
            "event": "state_transition",
            "from_state": str(from_state),
            "to_state": str(to_state),
            "time_s": time_s,
            "name": in_name,
        }
        self.debugger.debug(log_message)
