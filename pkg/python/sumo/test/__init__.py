from .sumo_test_suite import runtests
