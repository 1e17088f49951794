from app.exceptions import ConfigurationError
from app.workers.handlers.scenario_handler import (
    handle_gaussian,
    handle_banana,
    handle_uniform1d,
    handle_normal1d,
    handle_coin1d,
)

HANDLERS = {
    "gaussian": handle_gaussian,
    "banana": handle_banana,
    "uniform1d": handle_uniform1d,
    "normal1d": handle_normal1d,
    "coin1d": handle_coin1d,
}

SCENARIO_DIMS = {
    "gaussian": 2,
    "banana": 2,
    "uniform1d": 1,
    "normal1d": 1,
    "coin1d": 1,
}


def get_handler_for_scenario(scenario: str):
    handler = HANDLERS.get(scenario)
    if not handler:
        raise ConfigurationError(
            message="Unknown scenario",
            detail=f"Unknown scenario: {scenario} (expected one of {', '.join(sorted(HANDLERS))})"
        )
    return handler


def get_scenario_dim(scenario: str) -> int:
    get_handler_for_scenario(scenario)
    return SCENARIO_DIMS[scenario]
