class Option:
    UNINITIALIZED = -1

    def __init__(self, opt, long_opt):
        self.__option = opt
        self.__longOption = long_opt
        self.__required = False
        self.__argCount = Option.UNINITIALIZED

    def get_key(self):
        return self.__longOption if self.__option is None else self.__option

    def get_long_opt(self):
        return self.__longOption

    def is_required(self):
        return self.__required

    def set_required(self, required):
        self.__required = required

    def set_args(self, count):
        self.__argCount = count

    def has_arg(self):
        return self.__argCount > 0

    def hash_code(self):
        return hash((self.__option, self.__longOption))
