# Intentionally empty; package marker for unittest discovery with -t .
