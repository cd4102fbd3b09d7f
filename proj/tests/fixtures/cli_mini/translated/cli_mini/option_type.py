from enum import Enum


class OptionType(Enum):
    FLAG = 0
    VALUE = 1
    LIST = 2

    @staticmethod
    def for_args(count):
        if count == 0:
            return OptionType.FLAG
        if count == 1:
            return OptionType.VALUE
        return OptionType.LIST
