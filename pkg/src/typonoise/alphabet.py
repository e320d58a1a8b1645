import string

DEFAULT_ALPHABET = string.ascii_lowercase


def normalize_word(word: str, alphabet: str = DEFAULT_ALPHABET) -> str | None:
    """Lowercase ``word``; None if it is empty or leaves the alphabet."""
    word = word.strip().lower()
    if not word or any(ch not in alphabet for ch in word):
        return None
    return word
