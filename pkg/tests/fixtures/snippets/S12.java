class S12 {
    boolean valid(boolean a, boolean b, boolean c, boolean d) {
        return a && b || c && d;
    }
}
