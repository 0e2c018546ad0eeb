"""Nelson-Siegel forward curves and the numerical impossibility demonstration."""
