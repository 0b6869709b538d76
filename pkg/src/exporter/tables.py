# ------ src/exporter/tables.py ------

import json
import logging
import os

import pandas as pd

from config.config import CSV_FLOAT_FORMAT
from src.loader.utils import ensure_directory_exists

logger = logging.getLogger(__name__)


def save_table(df, output_path):
    """
    Save a DataFrame as CSV with round-trip float formatting.

    Args:
        df (DataFrame): Table to write
        output_path (str): Path of the CSV file, or '-' for a string result

    Returns:
        str: The CSV text
    """
    text = df.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator='\n')
    if output_path != '-':
        ensure_directory_exists(os.path.dirname(output_path))
        with open(output_path, 'w', encoding='utf-8', newline='') as f:
            f.write(text)
        logger.info("table saved to %s", output_path)
    return text


def save_json(data, output_path):
    ensure_directory_exists(os.path.dirname(output_path))
    with open(output_path, 'w', encoding='utf-8') as f:
        if isinstance(data, str):
            f.write(data)
        else:
            json.dump(data, f, indent=2)
        f.write('\n')
    logger.info("JSON saved to %s", output_path)


def basins_frame(ts, lattice):
    """
    cell_index and the id of the first lattice attractor whose basin holds it (-1 if none).
    """
    owner = {}
    for attractor_id, record in enumerate(lattice):
        for cell in record.basin:
            owner.setdefault(cell, attractor_id)
    cells = ts.cells
    return pd.DataFrame({
        'cell_index': cells,
        'attractor_id': [owner.get(c, -1) for c in cells],
    })


def trajectory_frame(trajectory, dim=None):
    """
    Trajectory as a table: t, the coordinates (or state), and the terminal in the last column.

    Finite systems get a 'state' column; ODEs get x1..xdim.
    """
    data = {'t': trajectory.times}
    if dim is None:
        data['state'] = trajectory.points
    else:
        for axis in range(dim):
            data[f"x{axis + 1}"] = [p[axis] for p in trajectory.points]
    df = pd.DataFrame(data)
    df['escaped'] = 0
    df['t_escape'] = float('nan')
    if trajectory.terminal.kind == 'escaped':
        df.loc[len(df) - 1, 'escaped'] = 1
        df.loc[len(df) - 1, 't_escape'] = trajectory.terminal.t
    return df
