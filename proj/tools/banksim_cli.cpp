// Placeholder until the full CLI lands with the engine and explorer.
int main() { return 0; }
