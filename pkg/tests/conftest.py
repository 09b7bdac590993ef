from hypothesis import settings

settings.register_profile("det", derandomize=True, deadline=None, max_examples=60)
settings.load_profile("det")
