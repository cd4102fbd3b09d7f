package org.example.cli;

public final class OptionBuilder {
    private static String longopt;
    private static boolean required;
    private static int numberOfArgs = Option.UNINITIALIZED;

    private OptionBuilder() {
    }

    public static void withLongOpt(String name) {
        longopt = name;
    }

    public static void isRequired() {
        required = true;
    }

    public static void hasArgs(int count) {
        numberOfArgs = count;
    }

    public static Option create(String opt) {
        Option option = new Option(opt, longopt);
        option.setRequired(required);
        option.setArgs(numberOfArgs);
        reset();
        return option;
    }

    private static void reset() {
        longopt = null;
        required = false;
        numberOfArgs = Option.UNINITIALIZED;
    }
}
