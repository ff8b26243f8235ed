class S16 {
    String quote(String s) {
        char q = '"';
        String out = q + s + "\n\"done\"";
        return out;
    }
}
