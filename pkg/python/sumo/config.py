"""INI configuration helpers shared by the Hamiltonian reader and the CLI."""

import configparser
import os

from sumo.errors import ConfigError


SECTIONS = {
    'Hamiltonian': ('dimension', 'mass', 'model', 'r0_4', 'alpha', 'chi',
                    'r0_squared', 'kappa', 'cg_table'),
    'Terms': None,
    'Basis': ('kind', 'lambda', 'lambda_even', 'lambda_odd', 'lambdas',
              'scale', 'nu_max', 'v_max'),
    'Settings': ('tolerance', 'energy_cut', 'levels', 'drift_step',
                 'minimal_size', 'nu_reference', 'num_cpus', 'blocks'),
    'Scan': ('alphas', 'alpha_min', 'alpha_max', 'alpha_step', 'nu_reference'),
    'Variational': ('lambda_min', 'lambda_max', 'scale_min', 'scale_max',
                    'states', 'basis_size', 'candidates'),
    'CrystalField': ('chi', 'r0_squared', 'm_max'),
}




def load(path):
    """Read and validate an INI file.

    Parameters
    ----------
    path : str
        Configuration file, in INI format.

    Returns
    -------
    configparser.ConfigParser
    """
    if not os.path.isfile(path):
        raise ConfigError("configuration file {} not found".format(path))

    config = configparser.ConfigParser()
    try:
        config.read(path)
    except configparser.Error as err:
        raise ConfigError("cannot parse {}: {}".format(path, err)) from err

    for name in config.sections():
        if name not in SECTIONS:
            raise ConfigError("unknown section [{}] in {}".format(name, path))
        known = SECTIONS[name]
        if known is None:
            continue
        for key in config[name]:
            if key not in known:
                raise ConfigError("unknown key '{}' in section [{}] of {}".format(key, name, path))

    # relative table paths are taken from the config file's directory
    config.source_dir = os.path.dirname(os.path.abspath(path))
    return config



def get(config, section, key, cast=str, default=None):
    """``cast(config[section][key])`` or ``default`` when absent."""
    if config is None or not config.has_section(section) or key not in config[section]:
        return default
    raw = config[section][key]
    try:
        return cast(raw)
    except ValueError as err:
        raise ConfigError("[{}] {} = {!r}: {}".format(section, key, raw, err)) from err



def float_list(text):
    return tuple(float(x) for x in text.replace(',', ' ').split())



def resolve_path(config, path):
    """Interpret ``path`` relative to the configuration file."""
    if path is None or os.path.isabs(path):
        return path
    here = getattr(config, 'source_dir', '.')
    candidate = os.path.join(here, path)
    return candidate if os.path.exists(candidate) else path



def int_list(text):
    return tuple(int(x) for x in text.replace(',', ' ').split())
