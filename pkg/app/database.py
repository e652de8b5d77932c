# app/database.py

import sqlite3
from typing import Optional, Union

from app.config import get_settings


def connect(path: Optional[str] = None) -> sqlite3.Connection:
    conn = sqlite3.connect(path or get_settings().database, check_same_thread=False)
    conn.row_factory = sqlite3.Row  # Allows accessing columns by name
    conn.execute("PRAGMA foreign_keys = ON")
    return conn


def create_tables(target: Union[sqlite3.Connection, str, None] = None):
    """Creates the store tables on a connection, or on the database at a path."""
    conn = target if isinstance(target, sqlite3.Connection) else connect(target)
    cursor = conn.cursor()

    # Stored test spaces, as canonical JSON
    cursor.execute("""
        CREATE TABLE IF NOT EXISTS spaces (
            id INTEGER PRIMARY KEY AUTOINCREMENT,
            name TEXT NOT NULL UNIQUE,
            document TEXT NOT NULL,
            created_at TEXT NOT NULL
        );
    """)

    # One row per verification run
    cursor.execute("""
        CREATE TABLE IF NOT EXISTS runs (
            id INTEGER PRIMARY KEY AUTOINCREMENT,
            suite TEXT NOT NULL,
            tool_version TEXT NOT NULL,
            config_echo TEXT NOT NULL, -- JSON
            created_at TEXT NOT NULL,
            exit_code INTEGER NOT NULL
        );
    """)

    cursor.execute("""
        CREATE TABLE IF NOT EXISTS run_items (
            id INTEGER PRIMARY KEY AUTOINCREMENT,
            run_id INTEGER NOT NULL,
            claim_id TEXT NOT NULL,
            reference TEXT NOT NULL,
            status TEXT NOT NULL, -- 'verified', 'refuted', 'skipped'
            witness TEXT, -- JSON
            runtime_ms REAL NOT NULL DEFAULT 0.0,
            expected TEXT,
            note TEXT NOT NULL DEFAULT '',
            FOREIGN KEY(run_id) REFERENCES runs(id) ON DELETE CASCADE
        );
    """)
    conn.commit()
    if conn is not target:
        conn.close()
