"""Asymmetric volatility connectedness from high-frequency price data."""

__version__ = "0.1.0"

from .connectedness import (  # noqa: F401
    SpilloverSnapshot,
    SystemLayout,
    directional_from,
    directional_sam,
    directional_to,
    directional_to_signed,
    net_spillover,
    sam,
    snapshot_from_fevd,
    total_spillover,
)
from .errors import (  # noqa: F401
    CollinearWindowError,
    ConfigError,
    DataError,
    DegenerateVariableError,
    NumericalError,
    SpillnetError,
)
from .fevd import FevdMatrix, gfevd  # noqa: F401
from .ingest import (  # noqa: F401
    IntradayGrid,
    SessionCalendar,
    TickSeries,
    assign_trading_day,
    build_calendar,
    resample,
)
from .realized import (  # noqa: F401
    DailyMeasures,
    MeasurePanel,
    build_panel,
    intraday_returns,
    realized_semivariances,
    realized_variance,
)
from .rolling import (  # noqa: F401
    RollingConfig,
    SpilloverSeries,
    bootstrap_ci,
    run_rolling,
    test_hypotheses,
)
from .var import VarModel, fit_var, ma_coefficients, select_lag, simulate_var  # noqa: F401
