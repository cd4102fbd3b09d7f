from cli_mini.missing_option_exception import MissingOptionException


class Options:
    def __init__(self):
        self.__shortOpts = {}
        self.__longOpts = {}
        self.__requiredOpts = []

    def add_option(self, opt):
        key = opt.get_key()
        if opt.get_long_opt() is not None:
            self.__longOpts[opt.get_long_opt()] = opt
        if opt.is_required():
            if key in self.__requiredOpts:
                self.__requiredOpts.remove(key)
            self.__requiredOpts.append(key)
        self.__shortOpts[key] = opt
        return self

    def get_required_options(self):
        return tuple(self.__requiredOpts)

    def get_matching_options(self, prefix):
        matching = []
        for long_opt in self.__longOpts:
            if long_opt.startswith(prefix):
                matching.append(long_opt)
        return matching

    def has_option(self, opt):
        return opt in self.__shortOpts or opt in self.__longOpts

    def check_required(self):
        if self.__requiredOpts:
            raise MissingOptionException(self.__requiredOpts)
