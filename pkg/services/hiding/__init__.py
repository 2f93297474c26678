# Hiding oracles package
