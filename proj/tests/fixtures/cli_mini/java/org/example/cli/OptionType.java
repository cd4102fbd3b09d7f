package org.example.cli;

public enum OptionType {
    FLAG,
    VALUE,
    LIST;

    public static OptionType forArgs(int count) {
        if (count == 0) {
            return FLAG;
        }
        if (count == 1) {
            return VALUE;
        }
        return LIST;
    }
}
