class MissingOptionException(Exception):
    def __init__(self, missing_options):
        super().__init__(MissingOptionException.__create_message(missing_options))
        self.__missingOptions = missing_options

    def get_missing_options(self):
        return self.__missingOptions

    @staticmethod
    def __create_message(missing_options):
        suffix = "" if len(missing_options) == 1 else "s"
        return "Missing required option" + suffix + ": " + ", ".join(missing_options)
