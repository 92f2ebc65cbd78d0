# shared/__init__.py
# Cross-cutting infrastructure: logging, configuration, errors, parallel execution.
pass
