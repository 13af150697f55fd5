import os
import logging
from dataclasses import dataclass
from dotenv import load_dotenv

from config.constants import CLI_DEFAULTS

load_dotenv()

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


@dataclass(frozen=True)
class Settings:
    log_level: str
    log_file: str
    seed: int
    output_format: str
    host: str
    port: int


def get_settings() -> Settings:
    return Settings(
        log_level=os.getenv("ROTOR_LOG_LEVEL", "INFO").upper(),
        log_file=os.getenv("ROTOR_LOG_FILE", "rotor_coherent.log"),
        seed=int(os.getenv("ROTOR_SEED", str(CLI_DEFAULTS["seed"]))),
        output_format=os.getenv("ROTOR_OUTPUT_FORMAT", CLI_DEFAULTS["format"]),
        host=os.getenv("ROTOR_HOST", "0.0.0.0"),
        port=int(os.getenv("ROTOR_PORT", "8009")),
    )


def configure_logging(settings: Settings, verbose: bool = False) -> None:
    level = logging.DEBUG if verbose else getattr(logging, settings.log_level, logging.INFO)
    logging.basicConfig(
        level=level,
        format=LOG_FORMAT,
        handlers=[
            logging.StreamHandler(),
            logging.FileHandler(settings.log_file)
        ]
    )
