package org.example.cli;

public final class Stats {
    private Stats() {
    }

    public static double mean(double[] values) {
        double sum = 0.0;
        for (double v : values) {
            sum += v;
        }
        return sum / values.length;
    }

    public static int quotient(int a, int b) {
        return a / b;
    }
}
