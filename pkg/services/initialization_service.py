import time
import logging
import traceback
from typing import Optional

from config.settings import Settings, get_settings
from services.evolution_service import EvolutionService
from services.expectation_service import ExpectationService
from services.resolution_service import ResolutionService
from services.table_service import TableService
from services.verification_service import VerificationService
from states.families import builtin_family
from utils.csv_formatter import TableFormatter

logger = logging.getLogger(__name__)


class InitializationService:
    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or get_settings()
        self.expectation_service = None
        self.resolution_service = None
        self.evolution_service = None
        self.table_service = None
        self.verification_service = None
        self.formatter = None
        self.families_loaded = 0

    def initialize(self, seed: Optional[int] = None, output_format: Optional[str] = None) -> bool:
        logger.info("Starting service initialization...")
        start_time = time.time()

        try:
            self._initialize_families()
            self._initialize_numerics()
            self._initialize_reporting(seed, output_format)

            logger.info(f"All services initialized successfully in {time.time() - start_time:.2f}s")
            return True

        except Exception as e:
            logger.error(f"Service initialization failed: {e}")
            logger.error(traceback.format_exc())
            return False

    def _initialize_families(self):
        try:
            for family_id in range(1, 9):
                builtin_family(family_id)
                self.families_loaded += 1
            logger.info(f"Loaded {self.families_loaded} builtin families")
        except Exception as e:
            logger.error(f"Family initialization failed: {e}")
            raise

    def _initialize_numerics(self):
        try:
            self.expectation_service = ExpectationService()
            self.resolution_service = ResolutionService()
            self.evolution_service = EvolutionService()
            logger.info("Numerical services initialized successfully")
        except Exception as e:
            logger.error(f"Numerical service initialization failed: {e}")
            raise

    def _initialize_reporting(self, seed: Optional[int], output_format: Optional[str]):
        try:
            self.table_service = TableService(self.expectation_service)
            self.verification_service = VerificationService(
                expectation_service=self.expectation_service,
                resolution_service=self.resolution_service,
                evolution_service=self.evolution_service,
                seed=seed if seed is not None else self.settings.seed
            )
            self.formatter = TableFormatter(output_format or self.settings.output_format)
            logger.info("Table, verification and formatting services initialized successfully")
        except Exception as e:
            logger.error(f"Reporting initialization failed: {e}")
            raise

    def get_initialization_status(self) -> dict:
        return {
            "families": self.families_loaded,
            "expectation_service": self.expectation_service is not None,
            "resolution_service": self.resolution_service is not None,
            "evolution_service": self.evolution_service is not None,
            "table_service": self.table_service is not None,
            "verification_service": self.verification_service is not None,
            "formatter": self.formatter is not None,
        }
