import hypothesis

hypothesis.settings.register_profile(
    "powerbasket", deadline=None, max_examples=50, print_blob=True
)
hypothesis.settings.load_profile("powerbasket")
