from pathlib import Path
from typing import Final, Literal

from platformdirs import user_config_dir, user_log_dir
from pydantic import Field
from pydantic_settings import (
    BaseSettings,
    PydanticBaseSettingsSource,
    SettingsConfigDict,
    TomlConfigSettingsSource,
)

APP_NAME = "spheig"
CONFIG_PATH = Path(user_config_dir(APP_NAME)) / "config.toml"
LOG_DIR = Path(user_log_dir(APP_NAME))
CLI_LOG_PATH = LOG_DIR / "cli.log"

LogLevel = Literal["TRACE", "DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]


class Settings(BaseSettings):
    debug: bool = False
    log_level: LogLevel = "INFO"

    # worker pool cap for family, tau and sweep solves
    threads: int = Field(default=4, ge=1)

    # shooting
    ode_rtol: float = Field(default=1e-11, gt=0.0)
    ode_atol: float = Field(default=1e-13, gt=0.0)
    ode_nodes: int = Field(default=2001, ge=11)

    # surface finite elements
    fem_eps0: float = Field(default=1e-3, ge=0.0)
    picard_damping: float = Field(default=0.7, gt=0.0, le=1.0)
    picard_max_iter: int = Field(default=200, ge=1)
    picard_retries: int = Field(default=3, ge=1)

    # truncated cones
    newton_max_iter: int = Field(default=30, ge=1)
    cone_n_r: int = Field(default=64, ge=8)
    cone_n_theta: int = Field(default=32, ge=4)

    model_config = SettingsConfigDict(
        env_prefix="SPHEIG_",
        toml_file=CONFIG_PATH,
    )

    @property
    def effective_log_level(self) -> LogLevel:
        """Get effective log level: TRACE if debug=True, otherwise use log_level"""
        return "TRACE" if self.debug else self.log_level

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> tuple[PydanticBaseSettingsSource, ...]:
        return (
            init_settings,
            env_settings,
            TomlConfigSettingsSource(settings_cls),
        )


settings: Final = Settings()
