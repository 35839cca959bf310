"""

Version numbers follow the 'major.minor.revision' format. Major is incremented
for large additions (a new family of bases or a new solver), minor for
significant or backwards-incompatible changes to the public functions or the
result file schemas, and the revision for bug fixes and smaller enhancements.

The result file schemas carry their own version tag, written in the header of
every CSV/JSON file (see sumo.results).
"""

__version__ = '0.3.0'
