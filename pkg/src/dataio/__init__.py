# dataio/__init__.py
pass
