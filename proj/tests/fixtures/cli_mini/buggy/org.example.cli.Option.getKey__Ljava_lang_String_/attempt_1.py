def get_key(self):
    return self.__option if self.__option else self.__longOption
