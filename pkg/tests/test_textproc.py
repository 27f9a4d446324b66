from facdec.textproc import content_words, first_sentence, stopwords, tokenize


class TestTokenize:
    def test_lowercases_and_splits_on_punctuation(self):
        assert tokenize("Barack Obama, 44th President!") == [
            "barack",
            "obama",
            "44th",
            "president",
        ]

    def test_underscore_splits_words(self):
        assert tokenize("foo_bar") == ["foo", "bar"]

    def test_apostrophe_splits(self):
        assert tokenize("don't") == ["don", "t"]

    def test_unicode_words_survive(self):
        assert tokenize("Zürich café") == ["zürich", "café"]

    def test_empty(self):
        assert tokenize("") == []


class TestStopwords:
    def test_list_size(self):
        assert len(stopwords()) == 179

    def test_known_members(self):
        stops = stopwords()
        for word in ("the", "i", "we", "is", "of", "don", "t", "wouldn't"):
            assert word in stops

    def test_known_non_members(self):
        stops = stopwords()
        # "us" belongs to the first-person filter, not the stopword list
        for word in ("obama", "president", "famous", "matrix", "us"):
            assert word not in stops


class TestContentWords:
    def test_drops_stopwords(self):
        assert content_words("The Matrix is a film") == ["matrix", "film"]

    def test_keeps_order_and_multiplicity(self):
        assert content_words("Paris Paris the Paris") == ["paris", "paris", "paris"]

    def test_all_stopwords(self):
        assert content_words("the of is") == []


class TestFirstSentence:
    def test_stops_at_terminator(self):
        assert first_sentence("One fact. Another fact.") == "One fact."

    def test_question_and_bang_terminate(self):
        assert first_sentence("Really? Yes.") == "Really?"
        assert first_sentence("Go! Now.") == "Go!"

    def test_no_terminator_returns_all(self):
        assert first_sentence("no punctuation here") == "no punctuation here"

    def test_character_cap(self):
        long = "x" * 500 + "."
        assert len(first_sentence(long)) == 300
