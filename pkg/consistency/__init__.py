"""General consistency condition between a state model and a forward curve family."""
