import logging
import os
import uuid
from pathlib import Path

try:
    import duckdb
    _DUCKDB_AVAILABLE = True
except ImportError:
    _DUCKDB_AVAILABLE = False

logger = logging.getLogger("multicharlier.benchstore")

COLUMNS = ("run_id", "recorded_at", "strategy", "r", "sigma", "nmax", "seconds", "peak_bits", "entries")


class BenchStore:
    """Benchmark history in a DuckDB file. Without duckdb every call is a no-op."""

    def __init__(self, db_path: str):
        self.db_path = db_path
        self.run_id = uuid.uuid4().hex[:12]
        self.duck: "duckdb.DuckDBPyConnection | None" = None

    @property
    def available(self) -> bool:
        return self.duck is not None

    def connect(self) -> None:
        if not _DUCKDB_AVAILABLE:
            logger.warning(f"duckdb not installed; benchmark history at {self.db_path} is disabled")
            return
        parent = Path(self.db_path).parent
        if str(parent):
            os.makedirs(parent, exist_ok=True)
        self.duck = duckdb.connect(self.db_path)
        self.duck.execute("""
            CREATE TABLE IF NOT EXISTS bench_runs (
                run_id TEXT NOT NULL,
                recorded_at TIMESTAMP DEFAULT current_timestamp,
                strategy TEXT NOT NULL,
                r INTEGER NOT NULL,
                sigma TEXT NOT NULL,
                nmax INTEGER NOT NULL,
                seconds DOUBLE NOT NULL,
                peak_bits INTEGER NOT NULL,
                entries INTEGER NOT NULL
            )
        """)
        logger.debug(f"benchmark history connected at {self.db_path}")

    def record(self, rows: list[dict]) -> int:
        """Append rows ({strategy, r, sigma, nmax, seconds, peak_bits, entries}); returns rows written."""
        if not self.duck:
            return 0
        for row in rows:
            self.duck.execute(
                """
                INSERT INTO bench_runs (run_id, strategy, r, sigma, nmax, seconds, peak_bits, entries)
                VALUES (?, ?, ?, ?, ?, ?, ?, ?)
                """,
                [
                    self.run_id,
                    row["strategy"],
                    row["r"],
                    ",".join(row["sigma"]),
                    row["nmax"],
                    row["seconds"],
                    row["peak_bits"],
                    row["entries"],
                ],
            )
        return len(rows)

    def history(self, strategy: str | None = None, limit: int = 20) -> list[dict]:
        """Most recent rows first. Returns [] if unavailable."""
        if not self.duck:
            return []
        sql = f"SELECT {', '.join(COLUMNS)} FROM bench_runs"
        params: list = []
        if strategy:
            sql += " WHERE strategy = ?"
            params.append(strategy)
        sql += f" ORDER BY recorded_at DESC, nmax DESC LIMIT {int(limit)}"
        rel = self.duck.execute(sql, params)
        cols = [d[0] for d in rel.description]
        return [dict(zip(cols, row)) for row in rel.fetchall()]

    def close(self) -> None:
        if self.duck:
            self.duck.close()
            self.duck = None
