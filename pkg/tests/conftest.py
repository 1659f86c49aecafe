import pytest

from factoidlink.network import AttributeObject, SocialNetwork, UserRecord


def named_user(local_id, name):
    return UserRecord(str(local_id), {"name": AttributeObject(text=name)})


@pytest.fixture
def toy_source():
    """Five-user network with one text attribute and seven follow edges."""
    return SocialNetwork(
        "twitter",
        [
            named_user(1, "Amy Tan"),
            named_user(2, "Desmond"),
            named_user(3, "C L"),
            named_user(4, "Joey Lim"),
            named_user(5, "Nicole Tan"),
        ],
        [("1", "2"), ("2", "1"), ("1", "3"), ("3", "1"), ("3", "2"), ("4", "3"), ("5", "3")],
    )


@pytest.fixture
def toy_target():
    """Four-user counterpart network with overlapping people."""
    return SocialNetwork(
        "facebook",
        [
            named_user(6, "Amy Tan"),
            named_user(7, "Desmond Ng"),
            named_user(8, "Cindy Lim"),
            named_user(9, "Joey L"),
        ],
        [("6", "7"), ("7", "6"), ("6", "8"), ("8", "6"),
         ("7", "8"), ("8", "7"), ("8", "9"), ("9", "8")],
    )
