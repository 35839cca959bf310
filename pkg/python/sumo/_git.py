"""Read the package version from a source checkout, for setup.py.
"""

import ast
import os

VERSION_FILE = os.path.join(os.path.dirname(os.path.abspath(__file__)), '_version.py')



def read_version(path=VERSION_FILE):
    """Value assigned to ``__version__`` in ``path``, or None.

    The file is parsed, not executed, so nothing in sumo is imported and no
    runtime dependency needs to be installed yet.
    """
    with open(path, 'r') as f:
        tree = ast.parse(f.read(), filename=path)
    for node in tree.body:
        if isinstance(node, ast.Assign) and any(getattr(t, 'id', None) == '__version__'
                                                for t in node.targets):
            return ast.literal_eval(node.value)
    return None



def get_version():
    """sumo's ``major.minor.revision`` string; 'unknown' outside a checkout.

    Returns
    -------
    :class:`str`
    """
    try:
        version = read_version()
    except (OSError, SyntaxError, ValueError):
        return 'unknown'
    return 'unknown' if version is None else str(version)
