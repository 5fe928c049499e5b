pytest_plugins = ["arithreg.testing.fixtures"]
