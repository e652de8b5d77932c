# app/crud.py

import json
import sqlite3
from datetime import datetime
from typing import Dict, List, Optional

from app.models import ReportItem, RunSummary, StoredSpace, TestSpaceFile, VerificationReport
from app.serialization import canonical_json, space_to_file
from app.testspace import TestSpace


# --- Helper functions to parse rows into models ---
def _row_to_space(row: sqlite3.Row) -> Optional[StoredSpace]:
    if not row:
        return None
    space_dict = dict(row)
    space_dict['document'] = TestSpaceFile.model_validate_json(space_dict['document'])
    return StoredSpace.model_validate(space_dict)


def _row_to_item(row: sqlite3.Row) -> ReportItem:
    item_dict = dict(row)
    item_dict['witness'] = json.loads(item_dict['witness']) if item_dict['witness'] is not None else None
    return ReportItem.model_validate(item_dict)


# --- Space CRUD ---
def save_space(db: sqlite3.Connection, space: TestSpace) -> StoredSpace:
    """Inserts a space, replacing any stored space of the same name."""
    cursor = db.cursor()
    cursor.execute(
        """INSERT INTO spaces (name, document, created_at) VALUES (?, ?, ?)
           ON CONFLICT(name) DO UPDATE SET document = excluded.document, created_at = excluded.created_at""",
        (space.name, canonical_json(space_to_file(space)), datetime.now().isoformat())
    )
    db.commit()
    return get_space(db, space.name)


def get_space(db: sqlite3.Connection, name: str) -> Optional[StoredSpace]:
    cursor = db.cursor()
    cursor.execute("SELECT * FROM spaces WHERE name = ?", (name,))
    return _row_to_space(cursor.fetchone())


def get_all_spaces(db: sqlite3.Connection) -> List[StoredSpace]:
    cursor = db.cursor()
    cursor.execute("SELECT * FROM spaces ORDER BY name")
    return [_row_to_space(row) for row in cursor.fetchall()]


def delete_space(db: sqlite3.Connection, name: str) -> bool:
    cursor = db.cursor()
    cursor.execute("DELETE FROM spaces WHERE name = ?", (name,))
    db.commit()
    return cursor.rowcount > 0


# --- Run CRUD ---
def log_run(db: sqlite3.Connection, report: VerificationReport) -> int:
    """Stores a report and its items; returns the run id."""
    cursor = db.cursor()
    cursor.execute(
        "INSERT INTO runs (suite, tool_version, config_echo, created_at, exit_code) VALUES (?, ?, ?, ?, ?)",
        (report.suite, report.tool_version, json.dumps(report.config_echo, sort_keys=True),
         report.created_at.isoformat(), report.exit_code)
    )
    run_id = cursor.lastrowid
    cursor.executemany(
        """INSERT INTO run_items (run_id, claim_id, reference, status, witness, runtime_ms, expected, note)
           VALUES (?, ?, ?, ?, ?, ?, ?, ?)""",
        [(run_id, item.claim_id, item.reference, item.status,
          json.dumps(item.witness, sort_keys=True) if item.witness is not None else None,
          item.runtime_ms, item.expected, item.note) for item in report.items]
    )
    db.commit()
    return run_id


def get_run(db: sqlite3.Connection, run_id: int) -> Optional[VerificationReport]:
    cursor = db.cursor()
    cursor.execute("SELECT * FROM runs WHERE id = ?", (run_id,))
    row = cursor.fetchone()
    if not row:
        return None
    cursor.execute("SELECT * FROM run_items WHERE run_id = ? ORDER BY claim_id", (run_id,))
    items = [_row_to_item(item) for item in cursor.fetchall()]
    return VerificationReport(suite=row['suite'], items=items, tool_version=row['tool_version'],
                              config_echo=json.loads(row['config_echo']),
                              created_at=datetime.fromisoformat(row['created_at']))


def get_runs(db: sqlite3.Connection, suite: Optional[str] = None, limit: int = 20) -> List[RunSummary]:
    """Most recent runs first, with their item counts."""
    cursor = db.cursor()
    query = """
        SELECT r.*, COUNT(i.id) AS item_count
        FROM runs r LEFT JOIN run_items i ON i.run_id = r.id
    """
    params: list = []
    if suite:
        query += " WHERE r.suite = ?"
        params.append(suite)
    query += " GROUP BY r.id ORDER BY r.id DESC LIMIT ?"
    params.append(limit)
    cursor.execute(query, params)
    return [RunSummary.model_validate(dict(row)) for row in cursor.fetchall()]


def get_last_run_items(db: sqlite3.Connection, suite: str) -> List[ReportItem]:
    cursor = db.cursor()
    cursor.execute(
        """SELECT i.* FROM run_items i
           WHERE i.run_id = (SELECT MAX(id) FROM runs WHERE suite = ?)
           ORDER BY i.claim_id""",
        (suite,)
    )
    return [_row_to_item(row) for row in cursor.fetchall()]


def get_status_counts(db: sqlite3.Connection, run_id: int) -> Dict[str, int]:
    """Counts of verified/refuted/skipped items in a run."""
    cursor = db.cursor()
    cursor.execute("SELECT status, COUNT(*) AS n FROM run_items WHERE run_id = ? GROUP BY status", (run_id,))
    counts = {"verified": 0, "refuted": 0, "skipped": 0}
    counts.update({row['status']: row['n'] for row in cursor.fetchall()})
    return counts
