import { defineConfig } from 'vitest/config';

export default defineConfig({
	test: {
		environment: 'node',
		globalSetup: './test/setup-service.ts',
		testTimeout: 30_000,
		hookTimeout: 60_000,
	},
});
