from typing import Any, List, Sequence
import csv
import io
import json
import math
import os

import torch

from ..experiments.runner import SweepResult, QuantityStats
from ..experiments.scaling import ScalingTable
from ..errors import OutputError


SWEEP_HEADER = [
    'distance',
    'mean_eve_sinr',
    'se_eve_sinr',
    'p5',
    'p95',
    'bound_jensen',
    'mean_legit_far',
    'mean_legit_near',
    'mean_secrecy_bits',
    'trials',
]

SCALING_HEADER = [
    'M',
    'N',
    'mean_eve_sinr',
    'se',
    'lambda_min_over_M',
    'slope_so_far',
]


def fmt(value:float) -> str:
    if isinstance(value, int): return str(value)
    if math.isnan(value): return 'nan'
    return format(value, '.12g')


def complex_list(tensor:torch.Tensor) -> Any:
    if tensor.dim() == 0:
        value = complex(tensor.item())
        return [value.real, value.imag]
    return [complex_list(item) for item in tensor]


def sweep_rows(result:SweepResult) -> List[List[str]]:
    '''One row per grid point; quantities that were not requested read `nan`.'''

    missing = QuantityStats(math.nan, math.nan, math.nan, math.nan)
    rows = []
    for point in result.points:
        stats = lambda key: point.stats.get(key, missing)
        eve = stats('eve_opt')
        rows.append([
            fmt(point.value),
            fmt(eve.mean),
            fmt(eve.se),
            fmt(eve.p5),
            fmt(eve.p95),
            fmt(stats('bound_jensen').mean),
            fmt(stats('legit_ref_far').mean),
            fmt(stats('legit_opt_near').mean),
            fmt(stats('secrecy_far').mean),
            fmt(point.trials),
        ])
    return rows


def scaling_rows(table:ScalingTable) -> List[List[str]]:
    return [[
        fmt(row.M),
        fmt(row.N),
        fmt(row.mean_eve_sinr),
        fmt(row.se),
        fmt(row.lambda_min_over_M),
        fmt(row.slope_so_far),
    ] for row in table.rows]


def dumps_csv(header:Sequence[str], rows:Sequence[Sequence[str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def dumps_json(data:Any) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False) + '\n'


def check_writable(path:str):
    folder = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(folder) or not os.access(folder, os.W_OK):
        raise OutputError(f'cannot write to `{path}`')
    if os.path.isdir(path):
        raise OutputError(f'`{path}` is a directory')


def write_text(path:str, text:str):
    try:
        with open(path, 'w', encoding='utf-8', newline='') as f:
            f.write(text)
    except OSError as e:
        raise OutputError(f'cannot write to `{path}`: {e.strerror}')
