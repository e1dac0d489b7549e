"""
UCI regression protocol presets.

Data files are not bundled. Each preset names the file expected under the
data directory, laid out with the target column(s) last. Files holding two
targets (energy, naval) predict the first one.
"""
import logging
import os
from dataclasses import dataclass
from typing import Dict, Optional

from errors import PreconditionError
from .datasets import Dataset
from .delimited_reader import load_delimited

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class UCIPreset:
    name: str
    filename: str
    n_folds: int = 20
    hidden: int = 50
    target_cols: int = 1
    target_select: Optional[int] = None


UCI_PRESETS: Dict[str, UCIPreset] = {
    preset.name: preset for preset in (
        UCIPreset('boston', 'boston.txt'),
        UCIPreset('concrete', 'concrete.txt'),
        UCIPreset('energy', 'energy.txt', target_cols=2, target_select=0),
        UCIPreset('kin8nm', 'kin8nm.txt'),
        UCIPreset('naval', 'naval.txt', target_cols=2, target_select=0),
        UCIPreset('power', 'power.txt'),
        UCIPreset('protein', 'protein.txt', n_folds=5, hidden=100),
        UCIPreset('wine', 'wine.txt'),
        UCIPreset('yacht', 'yacht.txt'),
    )
}


def get_preset(name: str) -> UCIPreset:
    """UCI preset by name; unknown names raise PreconditionError"""
    try:
        return UCI_PRESETS[name]
    except KeyError:
        raise PreconditionError(f"unknown UCI dataset '{name}' (known: {', '.join(sorted(UCI_PRESETS))})")


def load_uci(name: str, data_dir: str, delimiter: Optional[str] = None) -> Dataset:
    """Read <data_dir>/<preset file> with the preset's target columns"""
    preset = get_preset(name)
    path = os.path.join(data_dir, preset.filename)
    dataset = load_delimited(path, preset.target_cols, delimiter, preset.target_select)
    return Dataset(dataset.X, dataset.Y, name=preset.name)
