"""Result tables with a fixed, versioned column schema per command.

CSV files carry the schema in a leading comment line
``# sumo-schema <command> v1``; JSON files mirror the same columns as
``{"schema": ..., "columns": [...], "rows": [...]}``.
"""

import json
import os
import sys

import numpy as np

from astropy.table import Table

from sumo.constants import SCHEMA_VERSION
from sumo.errors import ConfigError
from sumo.solve import SCAN_COLUMNS


# command -> (columns, dtypes, sort keys)
SCHEMAS = {
    'spectrum': (('block_name', 'block', 'level', 'energy', 'drift', 'nu_max'),
                 (str, str, int, float, float, int),
                 ('energy', 'block', 'level')),
    'scan': (SCAN_COLUMNS,
             (float, int, float, float, float, float, float, float, float, float),
             ('alpha', 'v')),
    'check': (('name', 'passed', 'error', 'tolerance'),
              (str, bool, float, float),
              ('name',)),
    'crystal-field': (('m', 'parity', 'level', 'central', 'aligned', 'perturbed', 'drift'),
                      (int, int, int, float, float, float, float),
                      ('m', 'parity', 'level')),
    'variational': (('v', 'scale', 'lam', 'energy', 'scale_over_sqrt_mass', 'deformation',
                     'selected_lam', 'selected_scale', 'selected_energy'),
                    (int, float, float, float, float, float, float, float, float),
                    ('v',)),
}

FORMATS = ('csv', 'json')




def schema_line(command):
    return 'sumo-schema {} {}'.format(command, SCHEMA_VERSION)



def new_table(command, rows=()):
    """Empty (or filled) table with the columns of ``command``, sorted."""
    if command not in SCHEMAS:
        raise ValueError("no result schema for command {!r}".format(command))
    names, dtypes, keys = SCHEMAS[command]
    rows = list(rows)
    if rows:
        table = Table(rows=rows, names=names, dtype=dtypes)
    else:
        table = Table(names=names, dtype=dtypes)
    if len(table):
        table.sort(list(keys))
    table.meta['comments'] = [schema_line(command)]
    table.meta['command'] = command
    return table



def _plain(value):
    """JSON-safe Python scalar; NaN becomes null."""
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        return None if not np.isfinite(value) else float(value)
    return str(value)



def to_json(table):
    command = table.meta['command']
    return {'schema': schema_line(command),
            'columns': list(table.colnames),
            'rows': [[_plain(row[name]) for name in table.colnames] for row in table]}



def infer_format(path, fmt=None):
    """``fmt`` if given, else from the extension of ``path`` (csv by default)."""
    if fmt is not None:
        fmt = fmt.lower()
        if fmt not in FORMATS:
            raise ConfigError("format must be one of {}, got {!r}".format(FORMATS, fmt))
        return fmt
    if path is not None and os.path.splitext(path)[1].lower() == '.json':
        return 'json'
    return 'csv'



def write_table(table, path=None, fmt=None):
    """Write ``table`` to ``path`` (stdout when None) as CSV or JSON."""
    fmt = infer_format(path, fmt)
    if fmt == 'json':
        text = json.dumps(to_json(table), indent=2)
        if path is None:
            print(text, flush=True)
        else:
            with open(path, 'w') as f:
                f.write(text + '\n')
        return

    if path is None:
        table.write(sys.stdout, format='ascii.csv')
    else:
        table.write(path, format='ascii.csv', overwrite=True)



def read_table(path):
    """Read a result file back; returns (schema line, Table)."""
    if os.path.splitext(path)[1].lower() == '.json':
        with open(path) as f:
            doc = json.load(f)
        columns = doc['columns']
        if doc['rows']:
            data = [[np.nan if x is None else x for x in row] for row in doc['rows']]
            table = Table(rows=data, names=columns)
        else:
            table = Table(names=columns)
        return doc['schema'], table

    table = Table.read(path, format='ascii.csv')
    comments = table.meta.get('comments', [])
    schema = next((c.strip() for c in comments if c.strip().startswith('sumo-schema')), None)
    return schema, table
