from .eve_distance import EveDistance
from .user_distance import UserDistance
from .num_pairs import NumPairs


TASKS = {
    'eve_distance':  EveDistance,
    'user_distance': UserDistance,
    'num_pairs':     NumPairs,
}
