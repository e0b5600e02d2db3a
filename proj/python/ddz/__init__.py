# Copyright 2026 The ddz Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Dou Di Zhu engine, RHCP and CQL agents, and the match harness."""

import json

from ddz._ddz import (
    CardError,
    Game,
    catalog_size,
    category_counts,
    classify,
    decompositions,
    legal_moves,
    normalize_cards,
    rhcp_act,
    rhcp_best_group,
    run_cli,
)
from ddz import _ddz

__all__ = [
    "CardError",
    "Game",
    "catalog_size",
    "category_counts",
    "classify",
    "decompositions",
    "legal_moves",
    "normalize_cards",
    "replay_record",
    "rhcp_act",
    "rhcp_best_group",
    "run_cli",
    "run_match",
]


def replay_record(path):
    """Validates a record file and returns it as a dict.

    Raises ValueError when a move is illegal or the file is malformed.
    """
    return json.loads(_ddz.replay_record_json(str(path)))


def run_match(landlord="rhcp", down="rhcp", up="rhcp", episodes=100, repeats=1, seed=1):
    """Plays repeats x episodes games and returns the match report."""
    return json.loads(_ddz.run_match_json(landlord, down, up, episodes, repeats, seed))
