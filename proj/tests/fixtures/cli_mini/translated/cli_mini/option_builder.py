from cli_mini.option import Option


class OptionBuilder:
    __longopt = None
    __required = False
    __numberOfArgs = Option.UNINITIALIZED

    @staticmethod
    def with_long_opt(name):
        OptionBuilder.__longopt = name

    @staticmethod
    def is_required():
        OptionBuilder.__required = True

    @staticmethod
    def has_args(count):
        OptionBuilder.__numberOfArgs = count

    @staticmethod
    def create(opt):
        option = Option(opt, OptionBuilder.__longopt)
        option.set_required(OptionBuilder.__required)
        option.set_args(OptionBuilder.__numberOfArgs)
        OptionBuilder.__reset()
        return option

    @staticmethod
    def __reset():
        OptionBuilder.__longopt = None
        OptionBuilder.__required = False
        OptionBuilder.__numberOfArgs = Option.UNINITIALIZED
