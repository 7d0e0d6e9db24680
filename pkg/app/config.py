from __future__ import annotations

import os
from dataclasses import dataclass

from dotenv import load_dotenv

load_dotenv()


@dataclass(frozen=True)
class Settings:
    threads: int = int(os.getenv("FEWWEIGHT_THREADS", "0"))  # 0 = cpu count

    # ── Hyperparameters (tunable, non-env) ──────────────────────────

    # Field construction
    field_size_ceiling: int = 2**31

    # Defining sets / distributions
    pair_ceiling: int = 10**8           # max q² enumerated per defining set
    direct_work_ceiling: int = 2 * 10**9  # max q²·n trace evaluations
    gamma_chunk: int = 64               # γ values per worker task

    # Sampling
    sample_size: int = 100
    sample_seed: int = 0

    # Character sums
    weil_sum_ceiling: int = 10**5

    # Logging
    log_format: str = "%(levelname)s:%(name)s:%(message)s"

    @property
    def workers(self) -> int:
        """Worker count for thread pools; falls back to the CPU count."""
        if self.threads > 0:
            return self.threads
        return os.cpu_count() or 1


settings = Settings()
