progname = 'MelnikovCert'
