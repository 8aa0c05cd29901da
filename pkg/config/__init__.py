from .settings import (
    RecurrenceConfig,
    EstimateConfig,
    CircleConfig,
    ConstructorConfig,
    ExitCodes,
    LOG_LEVEL,
    LOG_FILE,
)
