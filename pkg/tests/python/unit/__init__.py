# Package marker for unittest discovery.
