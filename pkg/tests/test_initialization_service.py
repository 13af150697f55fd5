from dataclasses import replace

from config.settings import get_settings
from services.initialization_service import InitializationService


def test_status_before_initialize() -> None:
    service = InitializationService()
    status = service.get_initialization_status()
    assert status["families"] == 0
    assert not any(value for key, value in status.items() if key != "families")


def test_initialize_wires_every_service() -> None:
    service = InitializationService(replace(get_settings(), output_format="text"))
    assert service.initialize(seed=11)
    status = service.get_initialization_status()
    assert status["families"] == 8
    assert all(status.values())
    assert service.formatter.output_format == "text"
    assert service.table_service.expectation_service is service.expectation_service


def test_explicit_format_wins_over_settings() -> None:
    service = InitializationService(replace(get_settings(), output_format="text"))
    assert service.initialize(output_format="csv")
    assert service.formatter.output_format == "csv"


def test_bad_format_fails_initialization() -> None:
    service = InitializationService()
    assert not service.initialize(output_format="xml")
    assert service.formatter is None
